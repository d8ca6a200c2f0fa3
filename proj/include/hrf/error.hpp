/*
 * Copyright (c) 2026 The hrforest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>

namespace hrf {

// Every error raised by the library derives from hrf::Error so callers can
// catch the whole family at stage boundaries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HRF_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

HRF_DEFINE_ERROR(DimensionError);      // vector or matrix length mismatch
HRF_DEFINE_ERROR(KeyMismatchError);    // handle produced under different keys
HRF_DEFINE_ERROR(AlignmentError);      // level or scale mismatch between operands
HRF_DEFINE_ERROR(DepthBudgetError);    // multiplicative levels exhausted
HRF_DEFINE_ERROR(KeyError);            // missing rotation key
HRF_DEFINE_ERROR(EncodingRangeError);  // message too large for the modulus chain
HRF_DEFINE_ERROR(LayoutError);         // L(2K-1) > n
HRF_DEFINE_ERROR(ValidationError);     // malformed model, schema violation
HRF_DEFINE_ERROR(FormatError);         // corrupt binary file
HRF_DEFINE_ERROR(ConfigError);
HRF_DEFINE_ERROR(UnsupportedTaskError);
HRF_DEFINE_ERROR(RangeError);          // polynomial activation outside [-1,1] contract
HRF_DEFINE_ERROR(StateError);          // e.g. normalizing twice
HRF_DEFINE_ERROR(DataError);           // dataset ingestion problems

#undef HRF_DEFINE_ERROR

}  // namespace hrf
