// Copyright 2026 The tracellm Authors.
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

#include "tracellm/baselines.hpp"
#include "tracellm/commands.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/demonstration.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/error.hpp"
#include "tracellm/experiment.hpp"
#include "tracellm/llm_client.hpp"
#include "tracellm/metrics.hpp"
#include "tracellm/prompting.hpp"
#include "tracellm/rng.hpp"
#include "tracellm/selection.hpp"
#include "tracellm/stats.hpp"
#include "tracellm/text.hpp"
