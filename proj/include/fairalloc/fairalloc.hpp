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

#ifndef FAIRALLOC_FAIRALLOC_HPP
#define FAIRALLOC_FAIRALLOC_HPP

#include "fairalloc/domain.hpp"
#include "fairalloc/error.hpp"
#include "fairalloc/exposure.hpp"
#include "fairalloc/format.hpp"
#include "fairalloc/io.hpp"
#include "fairalloc/lp.hpp"
#include "fairalloc/lp_builder.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/rounding.hpp"
#include "fairalloc/scenarios.hpp"
#include "fairalloc/simplex.hpp"
#include "fairalloc/tuner.hpp"

#endif  // FAIRALLOC_FAIRALLOC_HPP
