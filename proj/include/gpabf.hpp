// Copyright 2026 The gpabf Authors
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

#pragma once

// Umbrella header for the Gaussian-polynomial bilateral filter library.

#include "gpabf/analysis.hpp"
#include "gpabf/error.hpp"
#include "gpabf/gpa.hpp"
#include "gpabf/image.hpp"
#include "gpabf/kernels.hpp"
#include "gpabf/order_select.hpp"
#include "gpabf/parallel.hpp"
#include "gpabf/pgm.hpp"
#include "gpabf/reference.hpp"
#include "gpabf/spatial_conv.hpp"
