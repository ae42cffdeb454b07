#pragma once

// Umbrella header.

#include "qcalc/bounds.hpp"
#include "qcalc/kernels.hpp"
#include "qcalc/qcore.hpp"
#include "qcalc/quad.hpp"
#include "qcalc/report.hpp"
#include "qcalc/repr.hpp"
#include "qcalc/series.hpp"
#include "qcalc/special.hpp"
#include "qcalc/suite.hpp"
