#pragma once

#include "verifai/error.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace verifai::binary {

static_assert(std::endian::native == std::endian::little, "persisted formats are little-endian");

class Writer {
public:
    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void put(const T& value) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void put_array(std::span<const T> values) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
        bytes_.insert(bytes_.end(), p, p + values.size_bytes());
    }

    void put_string(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    void put_magic(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }

    void align(std::size_t alignment) {
        while (bytes_.size() % alignment != 0) {
            bytes_.push_back(0);
        }
    }

    std::size_t size() const noexcept { return bytes_.size(); }
    std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked cursor over persisted bytes; every overrun is reported as corrupt data.
class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    T get() {
        require(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string get_string() {
        auto n = get<std::uint32_t>();
        require(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    /// View of the next `count` elements; the caller guarantees alignment of T.
    template <typename T>
    std::span<const T> view(std::size_t count) {
        require(count * sizeof(T));
        if (reinterpret_cast<std::uintptr_t>(bytes_.data() + pos_) % alignof(T) != 0) {
            fail("misaligned section");
        }
        std::span<const T> out(reinterpret_cast<const T*>(bytes_.data() + pos_), count);
        pos_ += count * sizeof(T);
        return out;
    }

    void expect_magic(std::string_view magic) {
        require(magic.size());
        if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0) {
            fail("bad magic bytes");
        }
        pos_ += magic.size();
    }

    void align(std::size_t alignment) {
        while (pos_ % alignment != 0) {
            require(1);
            ++pos_;
        }
    }

    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorKind::corrupt, what_ + ": " + why + " at offset " + std::to_string(pos_));
    }

private:
    void require(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            fail("unexpected end of data");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

} // namespace verifai::binary
