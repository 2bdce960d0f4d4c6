#pragma once

#include "demonsim/accounting.hpp"
#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"
#include "demonsim/exact.hpp"
#include "demonsim/measurement.hpp"
#include "demonsim/montecarlo.hpp"
#include "demonsim/numeric.hpp"
#include "demonsim/protocols.hpp"
#include "demonsim/report.hpp"
#include "demonsim/sweep.hpp"
