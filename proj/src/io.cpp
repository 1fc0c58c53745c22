#include "labelkit/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace labelkit {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, long line, const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& field, const std::filesystem::path& path, long line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + field.size())
        parse_fail(path, line, "not a number: '" + field + "'");
    return v;
}

long parse_int(const std::string& field, const std::filesystem::path& path, long line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || end != begin + field.size())
        parse_fail(path, line, "not an integer: '" + field + "'");
    return v;
}

// Lines of `path` with trailing \r stripped (tolerates CRLF input).
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed: " + path.string());
    return std::move(buf).str();
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j, int indent) {
    write_text_file(path, j.dump(indent) + "\n");
}

nlohmann::json load_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_points_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points) {
    std::string out;
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
        if (c) out += ',';
        out += "x" + std::to_string(c);
    }
    out += '\n';
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (c) out += ',';
            out += format_double(points(r, c));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

Eigen::MatrixXd read_points_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) parse_fail(path, 1, "empty file");

    const std::vector<std::string> header = split(lines[0], ',');
    const Eigen::Index dim = static_cast<Eigen::Index>(header.size());
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (header[static_cast<std::size_t>(c)] != "x" + std::to_string(c))
            parse_fail(path, 1, "bad header field '" + header[static_cast<std::size_t>(c)] +
                                    "', expected 'x" + std::to_string(c) + "'");
    }

    std::vector<std::string> body;
    body.reserve(lines.size());
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) body.push_back(lines[i]);

    Eigen::MatrixXd points(static_cast<Eigen::Index>(body.size()), dim);
    for (std::size_t i = 0; i < body.size(); ++i) {
        const long line_no = static_cast<long>(i) + 2;
        const std::vector<std::string> fields = split(body[i], ',');
        if (static_cast<Eigen::Index>(fields.size()) != dim)
            parse_fail(path, line_no,
                       "expected " + std::to_string(dim) + " fields, got " + std::to_string(fields.size()));
        for (Eigen::Index c = 0; c < dim; ++c)
            points(static_cast<Eigen::Index>(i), c) = parse_double(fields[static_cast<std::size_t>(c)], path, line_no);
    }
    return points;
}

void write_membership_csv(const std::filesystem::path& path,
                          const std::vector<std::vector<int>>& labels_per_point) {
    std::string out = "point_index,label_ids\n";
    for (std::size_t i = 0; i < labels_per_point.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        const auto& ids = labels_per_point[i];
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (k) out += ';';
            out += std::to_string(ids[k]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<std::vector<int>> read_membership_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "point_index,label_ids")
        parse_fail(path, 1, "expected header 'point_index,label_ids'");

    std::vector<std::vector<int>> out;
    long expected_index = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const long line_no = static_cast<long>(i) + 1;
        const std::vector<std::string> fields = split(lines[i], ',');
        if (fields.size() != 2) parse_fail(path, line_no, "expected 2 fields");
        if (parse_int(fields[0], path, line_no) != expected_index)
            parse_fail(path, line_no, "point_index must be sequential from 0");
        ++expected_index;
        std::vector<int> ids;
        if (!fields[1].empty())
            for (const std::string& f : split(fields[1], ';'))
                ids.push_back(static_cast<int>(parse_int(f, path, line_no)));
        out.push_back(std::move(ids));
    }
    return out;
}

std::vector<std::vector<int>> membership_from_records(const std::vector<std::vector<int>>& record_members,
                                                      long point_count) {
    std::vector<std::vector<int>> per_point(static_cast<std::size_t>(point_count));
    for (std::size_t rec = 0; rec < record_members.size(); ++rec) {
        for (int p : record_members[rec]) {
            if (p < 0 || p >= point_count)
                throw std::out_of_range("record member index out of range: " + std::to_string(p));
            per_point[static_cast<std::size_t>(p)].push_back(static_cast<int>(rec));
        }
    }
    return per_point;
}

}  // namespace labelkit
