#ifndef CUMFOLIO_OUTPUT_STAGE_HPP
#define CUMFOLIO_OUTPUT_STAGE_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace cumfolio {

/// Tracks the files a command intends to write so a failure part-way through
/// leaves no partial outputs behind: reserve() before writing, commit() once
/// everything succeeded; the destructor deletes reserved files when the
/// command unwinds without committing.
class OutputStager {
public:
    explicit OutputStager(std::filesystem::path dir);
    OutputStager(const OutputStager&) = delete;
    OutputStager& operator=(const OutputStager&) = delete;
    ~OutputStager();

    const std::filesystem::path& dir() const { return dir_; }

    /// Register `filename` under the output directory; returns the full path.
    std::string reserve(const std::string& filename);

    /// Register an already-determined path (e.g. produced by a writer).
    void track(const std::string& path);

    void commit() { committed_ = true; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> reserved_;
    bool committed_ = false;
};

}  // namespace cumfolio

#endif  // CUMFOLIO_OUTPUT_STAGE_HPP
