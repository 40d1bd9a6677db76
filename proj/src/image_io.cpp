#include "filanet/image_io.hpp"

#include <fstream>
#include <string>

namespace filanet {

namespace {

// Netpbm header parsing. A cursor walks the raw bytes so every error can
// name the offset it occurred at.
struct Cursor {
    const std::string& buf;
    std::size_t pos = 0;
    const std::filesystem::path& path;

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(path.string() + ": " + msg + " at byte " + std::to_string(pos));
    }

    bool eof() const { return pos >= buf.size(); }

    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    // Whitespace and '#' comments, which run to end of line.
    void skip_separators() {
        while (!eof()) {
            if (is_space(buf[pos])) {
                ++pos;
            } else if (buf[pos] == '#') {
                while (!eof() && buf[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int parse_uint(const char* what, long limit = 1 << 30) {
        skip_separators();
        if (eof()) fail(std::string("missing ") + what);
        if (buf[pos] < '0' || buf[pos] > '9') {
            fail(std::string("malformed ") + what);
        }
        long value = 0;
        while (!eof() && buf[pos] >= '0' && buf[pos] <= '9') {
            value = value * 10 + (buf[pos] - '0');
            if (value > limit) fail(std::string(what) + " too large");
            ++pos;
        }
        return static_cast<int>(value);
    }
};

struct PnmData {
    char magic;     // '1', '2', '5'
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;   // raw sample values, row-major
};

PnmData read_pnm(const std::filesystem::path& path, bool allow_pbm) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path.string() + ": cannot open file");
    }
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Cursor cur{buf, 0, path};

    if (buf.size() < 2 || buf[0] != 'P') cur.fail("not a PNM file (bad magic)");
    const char magic = buf[1];
    if (magic != '1' && magic != '2' && magic != '5') cur.fail("unsupported PNM magic");
    if (magic == '1' && !allow_pbm) cur.fail("expected a grayscale PGM, got PBM");
    cur.pos = 2;

    PnmData out;
    out.magic = magic;
    out.width = cur.parse_uint("width");
    out.height = cur.parse_uint("height");
    if (out.width == 0 || out.height == 0) {
        cur.fail("zero image dimension");
    }

    int maxval = 1;
    if (magic != '1') {
        const std::size_t maxval_at = cur.pos;
        maxval = cur.parse_uint("maxval", 1L << 30);
        if (maxval == 0) {
            cur.pos = maxval_at;
            cur.fail("maxval is zero");
        }
        if (maxval > 255) {
            cur.pos = maxval_at;
            cur.fail("maxval " + std::to_string(maxval) + " exceeds 255");
        }
    }

    const std::size_t count =
        static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
    out.values.reserve(count);

    if (magic == '5') {
        // Exactly one whitespace byte separates the header from the raster.
        if (cur.eof() || !Cursor::is_space(buf[cur.pos])) {
            cur.fail("missing whitespace before raster");
        }
        ++cur.pos;
        if (buf.size() - cur.pos < count) {
            throw DataError(path.string() + ": truncated pixel data at byte " +
                            std::to_string(buf.size()) + ", expected " +
                            std::to_string(count) + " bytes after offset " +
                            std::to_string(cur.pos));
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<std::uint8_t>(buf[cur.pos + i]);
            if (v > maxval) {
                cur.pos += i;
                cur.fail("sample " + std::to_string(v) + " exceeds maxval " +
                         std::to_string(maxval));
            }
            out.values.push_back(v);
        }
    } else if (magic == '2') {
        for (std::size_t i = 0; i < count; ++i) {
            const int v = cur.parse_uint("pixel value", 1L << 30);
            if (v > maxval) {
                cur.fail("sample " + std::to_string(v) + " exceeds maxval " +
                         std::to_string(maxval));
            }
            out.values.push_back(static_cast<std::uint8_t>(v));
        }
    } else { // P1: bits, whitespace between them optional
        while (out.values.size() < count) {
            cur.skip_separators();
            if (cur.eof()) cur.fail("truncated pixel data");
            const char c = buf[cur.pos];
            if (c != '0' && c != '1') cur.fail("malformed PBM bit");
            out.values.push_back(c == '1' ? 1 : 0);
            ++cur.pos;
        }
    }
    return out;
}

} // namespace

ImageFragment load_image(const std::filesystem::path& path) {
    PnmData pnm = read_pnm(path, /*allow_pbm=*/false);
    for (auto& v : pnm.values) {
        if (v == 0) v = 1;   // brightness floor
    }
    return ImageFragment(pnm.height, pnm.width, std::move(pnm.values));
}

LabelMask load_mask(const std::filesystem::path& path) {
    PnmData pnm = read_pnm(path, /*allow_pbm=*/true);
    for (auto& v : pnm.values) {
        v = v != 0 ? 1 : 0;   // nonzero (or PBM black) = filament
    }
    return LabelMask(pnm.height, pnm.width, std::move(pnm.values));
}

namespace {

void write_p5(const std::filesystem::path& path, int height, int width,
              const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DataError(path.string() + ": write failed");
    }
}

} // namespace

void save_mask(const LabelMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(mask.labels().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = mask.labels()[i] ? 255 : 0;
    }
    write_p5(path, mask.height(), mask.width(), bytes);
}

void save_mask(const DetectionMask& mask, const std::filesystem::path& path) {
    save_mask(mask.labels, path);
}

void save_image(const ImageFragment& image, const std::filesystem::path& path) {
    write_p5(path, image.height(), image.width(), image.pixels());
}

} // namespace filanet
