// Copyright (c) 2026, the svault authors
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

#include "svault/catalog.hpp"
#include "svault/config.hpp"
#include "svault/csv.hpp"
#include "svault/daemon.hpp"
#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/pipeline.hpp"
#include "svault/rdp.hpp"
#include "svault/resample.hpp"
#include "svault/segment.hpp"
#include "svault/staging.hpp"
#include "svault/store.hpp"
#include "svault/synth.hpp"
#include "svault/tuner.hpp"
#include "svault/types.hpp"
