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

#ifndef TREEMIX_CORE_LOGISTIC_H_
#define TREEMIX_CORE_LOGISTIC_H_

namespace treemix {

// log(p / (1 - p)). Throws std::domain_error unless 0 < p < 1.
double logit(double p);

double sigmoid(double s);

// log(1 + exp(x)) without overflow.
double log1p_exp(double x);

// Negative log-likelihood of a binary label under margin s.
double logistic_loss(double margin, int label);

}  // namespace treemix

#endif  // TREEMIX_CORE_LOGISTIC_H_
