//
// Copyright 2026 The dpsis Authors
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
//

#ifndef DPSIS_DPSIS_HPP_
#define DPSIS_DPSIS_HPP_

#include "dpsis/bench.hpp"
#include "dpsis/brute_force.hpp"
#include "dpsis/csv.hpp"
#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"
#include "dpsis/lipschitz_topk.hpp"
#include "dpsis/metrics.hpp"
#include "dpsis/random.hpp"
#include "dpsis/selectors.hpp"

#endif  // DPSIS_DPSIS_HPP_
