#pragma once

#include <filesystem>
#include <vector>

#include "anvil/eval.hpp"

namespace anvil {

/// CSV schema: floorplan,framework,offline_device,online_device,mean_m,std_m,n_queries
void emit_matrix_csv(const EvalMatrix& matrix, const std::filesystem::path& path);
EvalMatrix load_matrix_csv(const std::filesystem::path& path);

/// One devices x devices grid of mean errors per framework, with the best
/// and worst cell of each block called out.
void emit_matrix_markdown(const EvalMatrix& matrix, const std::filesystem::path& path);

/// CSV schema: floorplan,framework,mean_m,std_m
void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void emit_summary_markdown(const std::vector<SummaryRow>& rows,
                           const std::filesystem::path& path);

} // namespace anvil
