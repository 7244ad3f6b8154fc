// Copyright (c) 2026 The HyperLips C++ Authors
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

#ifndef HYPERLIPS_MODEL_INPUTS_H_
#define HYPERLIPS_MODEL_INPUTS_H_

#include <span>

#include "hyperlips/image.h"
#include "hyperlips/media/mel.h"
#include "hyperlips/nn/tensor.h"

namespace hyperlips::model {

// [N, 1, 16, 80]; ShapeMismatch for chunks of any other size.
nn::Tensor mel_batch(std::span<const media::MelChunk> chunks);

// Lower halves of consecutive groups of five [N*5, 3, S, S] faces, stacked on
// the channel axis: [N, 15, S/2, S].
nn::Tensor sync_window(const nn::Tensor& frames);
nn::Tensor sync_window(std::span<const Image> frames);

nn::Tensor lower_half(const nn::Tensor& faces);

// Copy of [N, C, H, W] faces with rows [H/2, H) zeroed, outside the graph.
nn::Tensor lower_half_masked(const nn::Tensor& faces);

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_INPUTS_H_
