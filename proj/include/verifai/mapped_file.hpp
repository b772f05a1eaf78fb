#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

namespace verifai {

/// Read-only memory mapping of a whole file. Move-only.
class MappedFile {
public:
    MappedFile() = default;
    explicit MappedFile(const std::filesystem::path& path);
    ~MappedFile();

    MappedFile(MappedFile&& other) noexcept;
    MappedFile& operator=(MappedFile&& other) noexcept;
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    std::span<const std::uint8_t> bytes() const noexcept { return {data_, size_}; }
    bool is_open() const noexcept { return data_ != nullptr || size_ == 0; }

private:
    void reset() noexcept;

    const std::uint8_t* data_ = nullptr;
    std::size_t size_ = 0;
};

} // namespace verifai
