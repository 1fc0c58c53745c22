#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <stdexcept>

namespace labelkit::detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::runtime_error("expected a JSON array for a vector");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::runtime_error("expected a JSON array of rows for a matrix");
    const Eigen::Index nrows = static_cast<Eigen::Index>(j.size());
    if (nrows == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::Index ncols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(nrows, ncols);
    for (Eigen::Index r = 0; r < nrows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != ncols)
            throw std::runtime_error("ragged matrix rows in JSON");
        for (Eigen::Index c = 0; c < ncols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

}  // namespace labelkit::detail
