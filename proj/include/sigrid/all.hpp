// Copyright 2026 The Sigrid Authors. All Rights Reserved.
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

#include "sigrid/descriptors.hpp"
#include "sigrid/error.hpp"
#include "sigrid/evaluation.hpp"
#include "sigrid/format.hpp"
#include "sigrid/geometry.hpp"
#include "sigrid/gridmap.hpp"
#include "sigrid/image.hpp"
#include "sigrid/metrics.hpp"
#include "sigrid/pipeline.hpp"
#include "sigrid/render.hpp"
#include "sigrid/sigrid.hpp"
#include "sigrid/slic.hpp"
#include "sigrid/synthetic.hpp"
