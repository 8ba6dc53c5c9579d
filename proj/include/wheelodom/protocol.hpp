#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "wheelodom/crc16.hpp"
#include "wheelodom/errors.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

// Framed binary encoder link, 21 bytes per frame, all multi-byte fields
// little-endian:
//
//   offset  size  field
//   0       2     sync 0xAA 0x55
//   2       1     version (currently 1)
//   3       8     timestamp_us     u64
//   11      4     left_cum_ticks   i32
//   15      4     right_cum_ticks  i32
//   19      2     crc16            CRC-16/CCITT-FALSE over bytes 2..18
//
// Counts on the wire are cumulative, so a dropped frame loses no travel.

struct EncoderFrame {
    std::uint64_t timestamp_us = 0;
    std::int32_t left_cum_ticks = 0;
    std::int32_t right_cum_ticks = 0;
    std::uint8_t version = 1;

    friend bool operator==(const EncoderFrame&, const EncoderFrame&) = default;
};

inline constexpr std::size_t kFrameSize = 21;
inline constexpr std::uint8_t kSync0 = 0xAA;
inline constexpr std::uint8_t kSync1 = 0x55;
inline constexpr std::uint8_t kProtocolVersion = 1;

namespace detail {

inline void put_u16le(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

inline void put_u32le(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void put_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint16_t get_u16le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace detail

inline std::array<std::uint8_t, kFrameSize> encode_frame(const EncoderFrame& frame) {
    std::array<std::uint8_t, kFrameSize> bytes{};
    bytes[0] = kSync0;
    bytes[1] = kSync1;
    bytes[2] = frame.version;
    detail::put_u64le(&bytes[3], frame.timestamp_us);
    detail::put_u32le(&bytes[11], static_cast<std::uint32_t>(frame.left_cum_ticks));
    detail::put_u32le(&bytes[15], static_cast<std::uint32_t>(frame.right_cum_ticks));
    detail::put_u16le(&bytes[19], crc16_ccitt_false({bytes.data() + 2, 17}));
    return bytes;
}

struct ParseDiagnostics {
    std::uint64_t bad_crc = 0;
    std::uint64_t bad_version = 0;
    std::uint64_t resyncs = 0;          // runs of discarded bytes
    std::uint64_t trailing_partial = 0; // frame truncated at end of stream

    friend bool operator==(const ParseDiagnostics&, const ParseDiagnostics&) = default;
};

// Resumable frame scanner. Feed byte chunks in arrival order; parsing is
// total — corruption is skipped, counted, and never fatal. After a CRC or
// version failure the scanner advances two bytes past the sync word and
// rescans, so a genuine frame beginning anywhere after a corrupted region is
// always recovered.
class FrameParser {
public:
    void feed(std::span<const std::uint8_t> chunk) {
        buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
        std::size_t pos = 0;
        while (true) {
            const std::size_t sync = find_sync(pos);
            if (sync == npos) {
                // Keep a trailing 0xAA: it may be the first half of a sync
                // word split across chunks.
                std::size_t keep_from = buffer_.size();
                if (!buffer_.empty() && buffer_.back() == kSync0) keep_from -= 1;
                discard(pos, keep_from);
                buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(keep_from));
                return;
            }
            discard(pos, sync);
            if (buffer_.size() - sync < kFrameSize) {
                buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(sync));
                return;  // wait for the rest of a potential frame
            }
            const std::uint8_t* f = buffer_.data() + sync;
            if (f[2] != kProtocolVersion) {
                ++diagnostics_.bad_version;
                pos = sync + 2;
                in_discard_run_ = true;
                continue;
            }
            if (detail::get_u16le(f + 19) != crc16_ccitt_false({f + 2, 17})) {
                ++diagnostics_.bad_crc;
                pos = sync + 2;
                in_discard_run_ = true;
                continue;
            }
            EncoderFrame frame;
            frame.version = f[2];
            frame.timestamp_us = detail::get_u64le(f + 3);
            frame.left_cum_ticks = static_cast<std::int32_t>(detail::get_u32le(f + 11));
            frame.right_cum_ticks = static_cast<std::int32_t>(detail::get_u32le(f + 15));
            close_discard_run();
            frames_.push_back(frame);
            buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(sync + kFrameSize));
            pos = 0;
        }
    }

    // Call once the stream has ended; flags a truncated trailing frame.
    void finish() {
        if (!buffer_.empty()) {
            if (buffer_.size() >= 2 && buffer_[0] == kSync0 && buffer_[1] == kSync1)
                ++diagnostics_.trailing_partial;
            else if (buffer_.size() == 1 && buffer_[0] == kSync0)
                ++diagnostics_.trailing_partial;
            else
                in_discard_run_ = true;
            buffer_.clear();
        }
        close_discard_run();
    }

    const std::vector<EncoderFrame>& frames() const { return frames_; }
    std::vector<EncoderFrame> take_frames() { return std::move(frames_); }
    const ParseDiagnostics& diagnostics() const { return diagnostics_; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find_sync(std::size_t from) const {
        for (std::size_t i = from; i + 1 < buffer_.size(); ++i)
            if (buffer_[i] == kSync0 && buffer_[i + 1] == kSync1) return i;
        return npos;
    }

    void discard(std::size_t from, std::size_t to) {
        if (to > from) in_discard_run_ = true;
    }

    void close_discard_run() {
        if (in_discard_run_) {
            ++diagnostics_.resyncs;
            in_discard_run_ = false;
        }
    }

    std::vector<std::uint8_t> buffer_;
    std::vector<EncoderFrame> frames_;
    ParseDiagnostics diagnostics_;
    bool in_discard_run_ = false;
};

struct ParseResult {
    std::vector<EncoderFrame> frames;
    ParseDiagnostics diagnostics;
};

inline ParseResult parse_stream(std::span<const std::uint8_t> bytes) {
    FrameParser parser;
    parser.feed(bytes);
    parser.finish();
    return {parser.take_frames(), parser.diagnostics()};
}

struct TickLogResult {
    TickLog log;
    std::uint64_t dropped_nonmonotonic = 0;
};

// Orders frames into a logical tick log. Frames whose timestamp does not
// advance are dropped and counted. The 32-bit wire counters are unwrapped
// into 64-bit counts; correct as long as the true inter-frame delta stays
// below 2^30 ticks.
inline TickLogResult frames_to_ticklog(const std::vector<EncoderFrame>& frames) {
    if (frames.empty()) throw EmptyInputError("frames_to_ticklog: no frames");
    TickLogResult result;
    result.log.reserve(frames.size());
    result.log.push_back({frames.front().timestamp_us,
                          static_cast<std::int64_t>(frames.front().left_cum_ticks),
                          static_cast<std::int64_t>(frames.front().right_cum_ticks)});
    std::int32_t prev_left = frames.front().left_cum_ticks;
    std::int32_t prev_right = frames.front().right_cum_ticks;
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const EncoderFrame& f = frames[i];
        if (f.timestamp_us <= result.log.back().timestamp_us) {
            ++result.dropped_nonmonotonic;
            continue;
        }
        // Difference in wrapping 32-bit arithmetic, reinterpreted as signed.
        const std::int32_t d_left = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(f.left_cum_ticks) - static_cast<std::uint32_t>(prev_left));
        const std::int32_t d_right = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(f.right_cum_ticks) - static_cast<std::uint32_t>(prev_right));
        result.log.push_back({f.timestamp_us, result.log.back().left_ticks + d_left,
                              result.log.back().right_ticks + d_right});
        prev_left = f.left_cum_ticks;
        prev_right = f.right_cum_ticks;
    }
    return result;
}

// A tick log rendered as a frame stream. Counts are truncated to the wire's
// 32-bit counters (modulo 2^32), matching real hardware; frames_to_ticklog
// recovers the original values when deltas stay below 2^30.
inline std::vector<std::uint8_t> ticklog_to_bytes(const TickLog& log) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(log.size() * kFrameSize);
    for (const TickSample& s : log) {
        EncoderFrame frame;
        frame.timestamp_us = s.timestamp_us;
        frame.left_cum_ticks = static_cast<std::int32_t>(s.left_ticks);
        frame.right_cum_ticks = static_cast<std::int32_t>(s.right_ticks);
        const auto encoded = encode_frame(frame);
        bytes.insert(bytes.end(), encoded.begin(), encoded.end());
    }
    return bytes;
}

}  // namespace wheelodom
