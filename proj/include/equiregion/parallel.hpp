// Copyright 2026 the equiregion authors
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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace equiregion {

// EQUIREGION_THREADS if set to a positive integer, else hardware concurrency.
std::size_t worker_count();

// Splits [0, n) into `shards` contiguous ranges and runs body(shard, begin,
// end) on up to worker_count() threads. Callers reduce the per-shard results
// in shard order, which makes the outcome independent of the worker count.
template <class Body>
void for_each_shard(std::size_t n, std::size_t shards, Body&& body) {
  if (shards == 0) shards = 1;
  const std::size_t workers = std::min(worker_count(), shards);
  auto range = [&](std::size_t s, std::size_t& b, std::size_t& e) {
    b = n * s / shards;
    e = n * (s + 1) / shards;
  };
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) {
      std::size_t b, e;
      range(s, b, e);
      body(s, b, e);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t s = w; s < shards; s += workers) {
          std::size_t b, e;
          range(s, b, e);
          body(s, b, e);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace equiregion
