//
// Copyright 2026 The LSP Lab Authors
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

#ifndef LSP_FINITE_DIFF_H_
#define LSP_FINITE_DIFF_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "lsp/autodiff.h"

namespace lsp {

// Builds a scalar on the tape of its argument.
using ScalarFn = std::function<Var(Var)>;

struct FiniteDiffResult {
  // max_i |analytic_i - central_i| / max(1, |central_i|) over checked coords.
  double max_relative_error = 0.0;
  std::size_t worst_coordinate = 0;
  std::size_t checked = 0;
  // Coordinates where x +/- h flips the sign pattern of some relu-type
  // input. The derivative is not defined there, so they are left out.
  std::vector<std::size_t> kink_excluded;
};

// Compares reverse-mode gradients of `f` at `x` against central differences
// with step `h`. Throws a numerical error naming the coordinate if `f`
// evaluates to a non-finite value.
FiniteDiffResult FiniteDiffCheck(const ScalarFn& f, const Tensor& x, double h);

}  // namespace lsp

#endif  // LSP_FINITE_DIFF_H_
