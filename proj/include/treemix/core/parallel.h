// Copyright 2026 The treemix Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TREEMIX_CORE_PARALLEL_H_
#define TREEMIX_CORE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace treemix {

// Number of hardware threads, at least 1.
int default_workers();

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items must be
// independent. If any item throws, the exception of the lowest failing index
// is rethrown after all threads finish.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace treemix

#endif  // TREEMIX_CORE_PARALLEL_H_
