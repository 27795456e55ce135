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

// Builds the four-qubit PPT state from its seed, shows that it passes the
// partial transpose test, and certifies a dimension-free witness for it.

#include <cstdio>
#include <iostream>

#include "werner/werner.hpp"

int main(int argc, char** argv) {
  using namespace werner;
  const std::string dir = argc > 1 ? argv[1] : "fixtures";
  try {
    ElementFile seed = read_element_file(dir + "/eq4qb.seed.json");
    const WernerStateParam r = eta_state_to_mu_param(seed.element, 2);
    std::printf("state parameter: %zu nonzero coefficients, tau(r) = %s\n", r.r.support_size(),
                to_string(r.r.tau().re).c_str());

    const TensorOperator rho = mu(2, r.r);
    double worst = 1;
    for (const auto& s : bipartitions(4)) worst = std::min(worst, ppt_min_eigenvalue(rho, s));
    std::printf("smallest partial-transpose eigenvalue: %.3e\n", worst);

    const SdpSolution opt = solve(assemble_tpop(r, 2).problem);
    std::printf("tracial hierarchy, level 2: theta = %.6f (%s)\n", opt.epsilon, to_string(opt.status).c_str());

    TpopOptions complex_mode;
    complex_mode.real_mode = false;
    const SdpProblem p = assemble_tpop(r, 2, complex_mode).problem;
    const Rational theta = make_rational(9, 10);
    const SdpSolution feas = solve_feasibility(p, theta);
    const WitnessCertificate c = rationalize(feas, p, theta);
    const VerificationReport rep = verify_certificate(c, r);
    std::fputs(rep.to_string().c_str(), stdout);
    return rep.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
