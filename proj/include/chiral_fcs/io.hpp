// io.hpp - CSV writers for sweep tables, photon records and binned series,
// plus SHA-256 content hashes for the run manifest.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "chiral_fcs/dynamics.hpp"

namespace chiral_fcs::io {

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << bytes;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

/// Round-trippable scientific notation; nan for missing values.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

/// Minimal CSV table: header plus rows of preformatted cells.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width mismatch");
        rows_.push_back(std::move(cells));
    }
    void add_comment(const std::string& line) { comments_.push_back(line); }

    std::string str() const {
        std::ostringstream os;
        for (const auto& c : comments_) os << "# " << c << '\n';
        join(os, header_);
        for (const auto& r : rows_) join(os, r);
        return os.str();
    }

  private:
    static void join(std::ostringstream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }
    std::vector<std::string> header_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

/// time,channel with the record metadata in leading comment lines.
inline std::string record_csv(const PhotonRecord& rec, const std::string& config_hash, const std::string& label = {}) {
    CsvTable t({"time", "channel"});
    t.add_comment("seed=" + std::to_string(rec.seed));
    t.add_comment("dt=" + fmt(rec.dt));
    t.add_comment("T=" + fmt(rec.horizon));
    t.add_comment("config_hash=" + config_hash);
    if (!label.empty()) t.add_comment("label=" + label);
    for (const auto& e : rec.events) {
        t.add_row({fmt(e.time), rec.channel_labels.at(static_cast<std::size_t>(e.channel))});
    }
    return t.str();
}

inline std::string binned_csv(const BinnedSeries& s) {
    CsvTable t({"t_bin_start", "count_L", "count_R", "count_U"});
    for (std::size_t i = 0; i < s.bin_start.size(); ++i) {
        t.add_row({fmt(s.bin_start[i]), std::to_string(s.left[i]), std::to_string(s.right[i]),
                   std::to_string(s.unguided[i])});
    }
    return t.str();
}

/// Density matrix as row,col,re,im (row-major).
inline std::string matrix_csv(const Matrix& m) {
    CsvTable t({"row", "col", "re", "im"});
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            t.add_row({std::to_string(r), std::to_string(c), fmt(m(r, c).real()), fmt(m(r, c).imag())});
    return t.str();
}

/// Parse a CSV written by CsvTable (comments skipped). Used by tests and tools.
struct ParsedCsv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::out_of_range("csv: no column " + name);
    }
};

inline ParsedCsv parse_csv(const std::string& text) {
    ParsedCsv out;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!l.empty() && l.back() == ',') cells.emplace_back();
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            out.comments.push_back(line.substr(2));
        } else if (out.header.empty()) {
            out.header = split(line);
        } else {
            out.rows.push_back(split(line));
        }
    }
    return out;
}

}  // namespace chiral_fcs::io
