// Copyright 2026 The ftrl-dynamics Authors
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

#ifndef FTRL_PARALLEL_HPP_
#define FTRL_PARALLEL_HPP_

#include <functional>

namespace ftrl {

/// Thread budget for batch experiments: FTRL_THREADS if set (>= 1), else the
/// hardware concurrency.
int thread_cap();

/// Runs fn(0..n-1) on up to thread_cap() threads.  Workers pull disjoint
/// index ranges, so results written to pre-sized slots stay deterministic.
/// The first exception thrown by a worker is rethrown on the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace ftrl

#endif  // FTRL_PARALLEL_HPP_
