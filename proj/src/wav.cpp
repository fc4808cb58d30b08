#include "rnr/wav.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "rnr/errors.hpp"

namespace rnr {
namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((v >> shift) & 0xff));
    }
}

std::uint32_t get_u32(const std::string& b, std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) {
        v = (v << 8) | static_cast<unsigned char>(b[at + k]);
    }
    return v;
}

std::uint16_t get_u16(const std::string& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string encode_wav(const PcmBuffer& pcm) {
    const auto data_bytes = static_cast<std::uint32_t>(pcm.samples.size() * 2);
    const auto rate = static_cast<std::uint32_t>(pcm.sample_rate);
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (const std::int16_t s : pcm.samples) {
        put_u16(out, static_cast<std::uint16_t>(s));
    }
    return out;
}

PcmBuffer decode_wav(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
        throw UsageError("not a RIFF/WAVE file");
    }
    PcmBuffer pcm;
    bool have_fmt = false;
    std::size_t at = 12;
    while (at + 8 <= bytes.size()) {
        const std::string id = bytes.substr(at, 4);
        const std::uint32_t size = get_u32(bytes, at + 4);
        const std::size_t body = at + 8;
        if (body + size > bytes.size()) {
            throw UsageError("truncated chunk '" + id + "'");
        }
        if (id == "fmt ") {
            if (size < 16 || get_u16(bytes, body) != 1 || get_u16(bytes, body + 2) != 1 ||
                get_u16(bytes, body + 14) != 16) {
                throw UsageError("only PCM16 mono WAV is supported");
            }
            pcm.sample_rate = static_cast<int>(get_u32(bytes, body + 4));
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) {
                throw UsageError("data chunk before fmt chunk");
            }
            pcm.samples.resize(size / 2);
            for (std::size_t i = 0; i < pcm.samples.size(); ++i) {
                pcm.samples[i] = static_cast<std::int16_t>(get_u16(bytes, body + 2 * i));
            }
            return pcm;
        }
        at = body + size + (size & 1);
    }
    throw UsageError("no data chunk");
}

void write_wav(const std::filesystem::path& path, const PcmBuffer& pcm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot write " + path.string());
    }
    const std::string bytes = encode_wav(pcm);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

PcmBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_wav(ss.str());
}

}  // namespace rnr
