// Copyright 2026 The dlc Authors
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

#include <cstddef>
#include <functional>

namespace dlc {

/// Threads to use: DLC_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs fn(i, worker) for every i in [0, n) on up to `workers` threads, where
/// worker < workers identifies the calling thread. Indices are handed out in
/// increasing order; the first exception is rethrown after all threads stop.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t, unsigned)>& fn);

}  // namespace dlc
