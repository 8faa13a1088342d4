// Writes the bundled scenario files: make_scenarios <output dir>.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "radon/io.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_scenarios <dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  for (const auto& s : radon::bundled_scenarios()) {
    const auto path = dir / (s.name + ".json");
    std::ofstream(path, std::ios::binary) << radon::to_json(s).dump(2) << "\n";
    std::cout << path.string() << "\n";
  }
  return 0;
}
