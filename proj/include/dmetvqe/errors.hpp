// Copyright 2026 The dmetvqe Authors
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

#ifndef DMETVQE_ERRORS_HPP
#define DMETVQE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dmetvqe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpecError : Error {
    using Error::Error;
};

struct FractionalCountMismatch : Error {
    using Error::Error;
};

struct ConsistencyBreach : Error {
    using Error::Error;
};

struct UnsupportedStructure : Error {
    using Error::Error;
};

struct EigenSolverFailure : Error {
    using Error::Error;
};

struct DegenerateStep : Error {
    double best_mu;
    DegenerateStep(const std::string &what, double mu) : Error(what), best_mu(mu) {}
};

struct NonConvergence : Error {
    double best_mu;
    NonConvergence(const std::string &what, double mu) : Error(what), best_mu(mu) {}
};

}  // namespace dmetvqe

#endif  // DMETVQE_ERRORS_HPP
