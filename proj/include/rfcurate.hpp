// SPDX-License-Identifier: Apache-2.0
//
// rfcurate: RF fingerprinting dataset curation toolkit
// Copyright (C) 2026 The rfcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RFCURATE_HPP
#define RFCURATE_HPP

#include "rfcurate/common.hpp"
#include "rfcurate/fft.hpp"
#include "rfcurate/ofdm.hpp"
#include "rfcurate/resample.hpp"
#include "rfcurate/wavegen.hpp"
#include "rfcurate/burstdetect.hpp"
#include "rfcurate/sigstore.hpp"
#include "rfcurate/preambleeq.hpp"
#include "rfcurate/subsetselect.hpp"
#include "rfcurate/milp.hpp"
#include "rfcurate/evalharness.hpp"
#include "rfcurate/pipeline.hpp"

#endif
