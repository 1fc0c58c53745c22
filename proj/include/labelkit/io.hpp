#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace labelkit {

// Writes are atomic: content goes to a sibling temp file which is then
// renamed over the target, so readers never observe a half-written file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

void save_json(const std::filesystem::path& path, const nlohmann::json& j, int indent = 2);
nlohmann::json load_json(const std::filesystem::path& path);

// Point-cloud CSV: header "x0,x1,...", one row per point, values printed with
// %.17g so a write/read round trip is bit-exact.
void write_points_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points);
Eigen::MatrixXd read_points_csv(const std::filesystem::path& path);

// Membership CSV: header "point_index,label_ids"; label_ids is a
// semicolon-separated list of record indices, empty when the point belongs to
// no record.
void write_membership_csv(const std::filesystem::path& path,
                          const std::vector<std::vector<int>>& labels_per_point);
std::vector<std::vector<int>> read_membership_csv(const std::filesystem::path& path);

// Invert record member lists into a per-point list of record ids.
std::vector<std::vector<int>> membership_from_records(const std::vector<std::vector<int>>& record_members,
                                                      long point_count);

}  // namespace labelkit
