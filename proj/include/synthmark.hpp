// Copyright 2026 The Synthmark Authors
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

#include "synthmark/csv.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/forest.hpp"
#include "synthmark/harness.hpp"
#include "synthmark/metrics.hpp"
#include "synthmark/microdata.hpp"
#include "synthmark/models.hpp"
#include "synthmark/prf.hpp"
#include "synthmark/privacy.hpp"
#include "synthmark/stats.hpp"
#include "synthmark/store.hpp"
