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

// Compares both hierarchies on the symmetrizer (separable) and on the
// antisymmetrizer (entangled) for three parties.

#include <cstdio>

#include "werner/werner.hpp"

namespace {

using namespace werner;

void report(const char* name, const ExactElement& state) {
  const WernerStateParam r = WernerStateParam::from_element(state);
  for (int level = 2; level <= 3; ++level) {
    const SdpSolution pop = solve(assemble_pop(r, level).problem);
    const SdpSolution tpop = solve(assemble_tpop(r, level).problem);
    auto value = [](const SdpSolution& s) {
      return s.status == SolveStatus::kUnbounded ? -std::numeric_limits<double>::infinity() : s.epsilon;
    };
    std::printf("%-16s level %d   POP %10.6f   TPOP %10.6f\n", name, level, value(pop), value(tpop));
  }
}

}  // namespace

int main() {
  report("symmetrizer", central_idempotent(Partition({3})));
  report("antisymmetrizer", central_idempotent(Partition({1, 1, 1})));
  return 0;
}
