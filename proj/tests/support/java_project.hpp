// Deterministic synthetic Java projects for repository fixtures.

#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "git_fixture.hpp"

namespace fixture {

struct Method {
  std::string name;
  std::vector<std::pair<std::string, std::string>> calls;  // (class, method)
  int extra = 0;                                           // padding statements
};

struct JavaClass {
  std::string name;
  std::string path;
  std::vector<Method> methods;
};

std::string render(const JavaClass &cls);

class SyntheticProject {
public:
  explicit SyntheticProject(unsigned seed) : rng_(seed) {}

  /// `files` classes with `methods` methods each and a few random calls.
  void populate(int files, int methods);
  void write_all(GitRepo &repo) const;

  /// One random edit: body change, new method, removed method, new call,
  /// new file, deleted file or renamed file. Returns a short description.
  std::string mutate(GitRepo &repo);

  std::string edit_body(GitRepo &repo);
  std::string add_method(GitRepo &repo);
  std::string remove_method(GitRepo &repo);
  std::string add_call(GitRepo &repo);
  std::string add_file(GitRepo &repo);
  std::string delete_file(GitRepo &repo);
  std::string rename_file(GitRepo &repo);

  const std::map<std::string, JavaClass> &classes() const { return classes_; }

private:
  JavaClass &pick_class();
  void write(GitRepo &repo, const JavaClass &cls) const;
  Method make_method(const std::string &name);

  std::mt19937 rng_;
  std::map<std::string, JavaClass> classes_;
  int next_class_ = 0;
  int next_method_ = 0;
};

}  // namespace fixture
