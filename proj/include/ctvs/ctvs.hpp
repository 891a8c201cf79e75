#pragma once

#include "ctvs/core.hpp"
#include "ctvs/rearrangement.hpp"
#include "ctvs/dictionary.hpp"
#include "ctvs/frechet.hpp"
#include "ctvs/measure.hpp"
#include "ctvs/homeomorphism.hpp"
#include "ctvs/signals.hpp"
#include "ctvs/io.hpp"
#include "ctvs/config.hpp"
#include "ctvs/experiment.hpp"
#include "ctvs/oracle.hpp"
