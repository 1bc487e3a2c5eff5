#pragma once

// Umbrella header: the whole library in one include. Each piece is also
// usable on its own; the CLI header pulls in CLI11, so embedders that only
// want the models should include the specific headers instead.

#include "qpow/cli.hpp"
#include "qpow/consensus.hpp"
#include "qpow/errors.hpp"
#include "qpow/feasibility.hpp"
#include "qpow/quantum.hpp"
#include "qpow/race.hpp"
#include "qpow/rng.hpp"
#include "qpow/schedule.hpp"
#include "qpow/schedule_io.hpp"
#include "qpow/validation.hpp"
