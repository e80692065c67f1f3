// Copyright 2026 The rsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Umbrella header.
#pragma once

#include "errors.hpp"
#include "instance_config.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "lhv_sampling.hpp"
#include "measurement_dual.hpp"
#include "operator_basis.hpp"
#include "operator_core.hpp"
#include "peps_construction.hpp"
#include "random.hpp"
#include "rsep_decomposition.hpp"
#include "verification_oracle.hpp"
