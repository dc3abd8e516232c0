/*
 * Copyright 2026 The tiger-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Umbrella header.

#include "tiger/baselines.hpp"
#include "tiger/cache.hpp"
#include "tiger/correlation.hpp"
#include "tiger/dataset.hpp"
#include "tiger/error.hpp"
#include "tiger/grounding.hpp"
#include "tiger/manifest.hpp"
#include "tiger/matrix.hpp"
#include "tiger/meta_eval.hpp"
#include "tiger/parallel.hpp"
#include "tiger/pipeline.hpp"
#include "tiger/report.hpp"
#include "tiger/tensor_io.hpp"
#include "tiger/text.hpp"
#include "tiger/tiger.hpp"
