#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/timeseries.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/matcher.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/evaluator.hpp>
#include <pulsecast/experiments.hpp>
#include <pulsecast/io.hpp>
