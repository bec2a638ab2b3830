#pragma once

#include <string>
#include <vector>

#include "ensembed/parafac2.hpp"
#include "ensembed/types.hpp"

namespace ensembed {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

/// Write a matrix in the view dump format: first line "N D", then N lines of
/// D space-separated decimal floats.
void dump_view(const std::string& path, const Matrix& matrix);

/// Read a matrix written by dump_view.
Matrix load_view(const std::string& path);

/// Write every view into `dir` as view_<m>_d<dim>.txt plus a views.list
/// manifest (one filename per line, view order). Returns the filenames.
std::vector<std::string> dump_views(const std::string& dir,
                                    const std::vector<Matrix>& views);

/// Read the views listed in `dir`/views.list, in manifest order.
std::vector<Matrix> load_views(const std::string& dir);

/// Model dump: header "N R M", then V, H, each s_m, and each Q_m, all as
/// rows of space-separated decimal floats.
void dump_model(const std::string& path, const Parafac2Model<Real>& model);

} // namespace ensembed
