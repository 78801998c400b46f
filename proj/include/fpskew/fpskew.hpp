// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Umbrella header: design-based estimation of quantile skewness (b2) and
// mean-median skewness (b3) in finite populations, with linearization
// variances, Woodruff density estimation, calibration weighting, and a
// reproducible Monte Carlo harness.

#ifndef FPSKEW_FPSKEW_HPP
#define FPSKEW_FPSKEW_HPP

#include "fpskew/calibration.hpp"
#include "fpskew/config.hpp"
#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/inference.hpp"
#include "fpskew/montecarlo.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/oracle.hpp"
#include "fpskew/population.hpp"
#include "fpskew/rng.hpp"
#include "fpskew/variance.hpp"
#include "fpskew/wcdf.hpp"

#endif  // FPSKEW_FPSKEW_HPP
