/*
 Copyright 2026 The stochtumor Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Umbrella header for the stumor library.

#pragma once

#include "stumor/adjoint.hpp"
#include "stumor/config.hpp"
#include "stumor/cosine_basis.hpp"
#include "stumor/cost.hpp"
#include "stumor/error.hpp"
#include "stumor/field_io.hpp"
#include "stumor/forward.hpp"
#include "stumor/functionals.hpp"
#include "stumor/grid.hpp"
#include "stumor/model.hpp"
#include "stumor/noise.hpp"
#include "stumor/optimize.hpp"
#include "stumor/parallel.hpp"
#include "stumor/potential.hpp"
#include "stumor/rng.hpp"
#include "stumor/sensitivity.hpp"
