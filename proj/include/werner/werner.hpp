// Copyright 2026 The werner-witness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Umbrella header for the whole library.

#include "werner/certify.hpp"
#include "werner/characters.hpp"
#include "werner/exact_linalg.hpp"
#include "werner/gmf_pop.hpp"
#include "werner/group_algebra.hpp"
#include "werner/io.hpp"
#include "werner/permutation.hpp"
#include "werner/rational.hpp"
#include "werner/sdp_problem.hpp"
#include "werner/sdp_solver.hpp"
#include "werner/trace_tpop.hpp"
#include "werner/werner_rep.hpp"
