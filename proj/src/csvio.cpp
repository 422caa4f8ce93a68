#include "einsel/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "einsel/rng.hpp"

namespace einsel::csv {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    append_row(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("csv: row width does not match header");
        append_row(row);
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("rename failed: " + path.string());
    }
}

std::string content_hash(std::string_view bytes) {
    const std::uint64_t h = detail::fnv1a64(bytes);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

Table state_table(const PureState& psi) {
    Table t;
    t.header = {"index", "re", "im"};
    const Eigen::VectorXcd& v = psi.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        t.rows.push_back({format_u64(static_cast<std::uint64_t>(i)), format_double(v(i).real()),
                          format_double(v(i).imag())});
    return t;
}

Table matrix_table(const Eigen::MatrixXcd& m) {
    Table t;
    t.header = {"index", "re", "im"};
    std::uint64_t idx = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            t.rows.push_back(
                {format_u64(idx), format_double(m(r, c).real()), format_double(m(r, c).imag())});
            ++idx;
        }
    return t;
}

}  // namespace einsel::csv
