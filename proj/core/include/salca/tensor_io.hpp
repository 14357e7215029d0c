#pragma once

#include <filesystem>

#include "salca/tensor.hpp"

namespace salca {

// On-disk layout: a one-line JSON header {"dtype","shape","version"} followed
// by a newline and the raw little-endian row-major payload. Round trips are
// byte-exact for every dtype.
inline constexpr int kTensorFileVersion = 1;

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace salca
