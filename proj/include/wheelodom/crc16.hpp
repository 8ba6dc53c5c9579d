#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace wheelodom {

// CRC-16/CCITT-FALSE: polynomial 0x1021, initial value 0xFFFF, no input or
// output reflection, no final XOR. Check value: crc16("123456789") = 0x29B1.
namespace detail {

constexpr std::array<std::uint16_t, 256> make_crc16_table() {
    std::array<std::uint16_t, 256> table{};
    for (int byte = 0; byte < 256; ++byte) {
        std::uint16_t reg = static_cast<std::uint16_t>(byte << 8);
        for (int bit = 0; bit < 8; ++bit)
            reg = (reg & 0x8000u) ? static_cast<std::uint16_t>((reg << 1) ^ 0x1021u)
                                  : static_cast<std::uint16_t>(reg << 1);
        table[static_cast<std::size_t>(byte)] = reg;
    }
    return table;
}

inline constexpr std::array<std::uint16_t, 256> kCrc16Table = make_crc16_table();

}  // namespace detail

inline std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
    std::uint16_t reg = 0xFFFFu;
    for (std::uint8_t byte : data)
        reg = static_cast<std::uint16_t>((reg << 8) ^
                                         detail::kCrc16Table[((reg >> 8) ^ byte) & 0xFFu]);
    return reg;
}

}  // namespace wheelodom
