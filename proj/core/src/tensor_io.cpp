#include "salca/tensor_io.hpp"

#include <fstream>
#include <string>

#include "json.hpp"

#include "salca/errors.hpp"

namespace salca {

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
    nlohmann::json header;
    header["dtype"] = std::string(dtype_name(tensor.dtype()));
    header["shape"] = tensor.shape();
    header["version"] = kTensorFileVersion;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << header.dump() << '\n';
    const auto payload = tensor.raw();
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw CorruptFileError("missing header line: " + path.string());
    }

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad header json in " + path.string() + ": " + e.what());
    }
    if (!header.is_object() || !header.contains("dtype") || !header.contains("shape") ||
        !header.contains("version")) {
        throw FormatError("header missing dtype/shape/version: " + path.string());
    }
    if (header["version"].get<int>() != kTensorFileVersion) {
        throw FormatError("unsupported tensor file version in " + path.string());
    }
    const Dtype dtype = dtype_from_name(header["dtype"].get<std::string>());
    auto shape = header["shape"].get<std::vector<std::size_t>>();

    std::vector<std::byte> payload;
    {
        const auto header_end = in.tellg();
        in.seekg(0, std::ios::end);
        const auto file_end = in.tellg();
        payload.resize(static_cast<std::size_t>(file_end - header_end));
        in.seekg(header_end);
        in.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
        if (!in) {
            throw IoError("read failed: " + path.string());
        }
    }
    return Tensor::from_raw(dtype, std::move(shape), std::move(payload));
}

}  // namespace salca
