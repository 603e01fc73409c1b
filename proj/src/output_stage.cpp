#include "cumfolio/output_stage.hpp"

#include <system_error>

namespace cumfolio {

OutputStager::OutputStager(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

OutputStager::~OutputStager() {
    if (committed_) return;
    for (const auto& path : reserved_) {
        std::error_code ec;  // best-effort cleanup; never throw from a destructor
        std::filesystem::remove(path, ec);
    }
}

std::string OutputStager::reserve(const std::string& filename) {
    reserved_.push_back(dir_ / filename);
    return reserved_.back().string();
}

void OutputStager::track(const std::string& path) { reserved_.emplace_back(path); }

}  // namespace cumfolio
