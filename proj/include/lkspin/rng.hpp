/*
   Copyright 2026 The lkspin Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace lkspin {

// Philox4x32-10 counter-based generator. Every output block is a pure function
// of (key, counter), so draws can be addressed directly instead of consumed in
// sequence.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed);

    Block operator()(Block counter) const;

    // Two independent uniforms in (0, 1) from the block at the counter.
    std::pair<double, double> uniforms(Block counter) const;

    // Two independent standard normals (Box-Muller) from the block at the counter.
    std::pair<double, double> normals(Block counter) const;

private:
    std::array<std::uint32_t, 2> key_;
};

// Seed of an independent stream derived from (master, index, tag).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint32_t tag = 0);

} // namespace lkspin
