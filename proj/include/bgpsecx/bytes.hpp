/*
 * Copyright 2026 The BGPSecX Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgpsecx/error.hpp"

namespace bgpsecx {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Big-endian cursor over a byte span. Every read is bounds-checked and
/// throws Error(underrun) when the span is exhausted.
class ByteReader {
public:
    ByteReader(ByteView data, Errc underrun) : data_(data), underrun_(underrun) {}

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }
    bool empty() const noexcept { return remaining() == 0; }

    std::uint8_t u8()
    {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16()
    {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u24()
    {
        need(3);
        std::uint32_t v = (std::uint32_t{data_[pos_]} << 16) | (std::uint32_t{data_[pos_ + 1]} << 8) |
                          data_[pos_ + 2];
        pos_ += 3;
        return v;
    }

    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    ByteView take(std::size_t n)
    {
        need(n);
        ByteView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void skip(std::size_t n)
    {
        need(n);
        pos_ += n;
    }

private:
    void need(std::size_t n) const
    {
        if (remaining() < n) {
            throw Error(underrun_, "need " + std::to_string(n) + " octets at offset " +
                                       std::to_string(pos_) + ", have " +
                                       std::to_string(remaining()));
        }
    }

    ByteView data_;
    std::size_t pos_ = 0;
    Errc underrun_;
};

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v)
    {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u24(std::uint32_t v)
    {
        out_.push_back(static_cast<std::uint8_t>(v >> 16));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v)
    {
        for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void u64(std::uint64_t v)
    {
        for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void bytes(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
    void bytes(std::string_view v) { out_.insert(out_.end(), v.begin(), v.end()); }

    /// Overwrites a previously written big-endian u16 at `offset`.
    void patch_u16(std::size_t offset, std::uint16_t v)
    {
        out_.at(offset) = static_cast<std::uint8_t>(v >> 8);
        out_.at(offset + 1) = static_cast<std::uint8_t>(v);
    }

    std::size_t size() const noexcept { return out_.size(); }
    Bytes& buffer() noexcept { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

std::string to_hex(ByteView data);
/// Throws Error(SchemaError) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

}  // namespace bgpsecx
