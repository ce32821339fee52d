#include "java_project.hpp"

#include <algorithm>
#include <iterator>

namespace fixture {

std::string render(const JavaClass &cls) {
  std::string s = "package demo;\n\npublic class " + cls.name + " {\n";
  for (const auto &m : cls.methods) {
    s += "  static int " + m.name + "(int x) {\n";
    s += "    int y = x + " + std::to_string(m.name.size()) + ";\n";
    s += "    if (y > 10) {\n      y = y - 1;\n    }\n";
    for (int i = 0; i < m.extra; ++i) s += "    y = y * " + std::to_string(i + 2) + " + x;\n";
    for (const auto &[c, callee] : m.calls) {
      if (c == cls.name)
        s += "    y = y + " + callee + "(y);\n";
      else
        s += "    y = y + " + c + "." + callee + "(y);\n";
    }
    s += "    return y;\n  }\n\n";
  }
  s += "}\n";
  return s;
}

Method SyntheticProject::make_method(const std::string &name) {
  Method m;
  m.name = name;
  m.extra = static_cast<int>(rng_() % 3);
  return m;
}

void SyntheticProject::populate(int files, int methods) {
  for (int f = 0; f < files; ++f) {
    JavaClass cls;
    cls.name = "C" + std::to_string(next_class_++);
    cls.path = "src/demo/" + cls.name + ".java";
    for (int m = 0; m < methods; ++m) cls.methods.push_back(make_method("m" + std::to_string(next_method_++)));
    classes_[cls.name] = std::move(cls);
  }
  std::vector<std::pair<std::string, std::string>> all;
  for (const auto &[name, cls] : classes_)
    for (const auto &m : cls.methods) all.emplace_back(name, m.name);
  for (auto &[name, cls] : classes_)
    for (auto &m : cls.methods) {
      int calls = static_cast<int>(rng_() % 3);
      for (int i = 0; i < calls; ++i) {
        const auto &target = all[rng_() % all.size()];
        if (target.second != m.name) m.calls.push_back(target);
      }
    }
}

void SyntheticProject::write(GitRepo &repo, const JavaClass &cls) const { repo.write(cls.path, render(cls)); }

void SyntheticProject::write_all(GitRepo &repo) const {
  for (const auto &[name, cls] : classes_) write(repo, cls);
}

JavaClass &SyntheticProject::pick_class() {
  auto it = classes_.begin();
  std::advance(it, static_cast<long>(rng_() % classes_.size()));
  return it->second;
}

std::string SyntheticProject::edit_body(GitRepo &repo) {
  auto &cls = pick_class();
  if (cls.methods.empty()) return add_method(repo);
  auto &m = cls.methods[rng_() % cls.methods.size()];
  m.extra += 1 + static_cast<int>(rng_() % 2);
  write(repo, cls);
  return "edit " + cls.name + "." + m.name;
}

std::string SyntheticProject::add_method(GitRepo &repo) {
  auto &cls = pick_class();
  cls.methods.push_back(make_method("m" + std::to_string(next_method_++)));
  write(repo, cls);
  return "add " + cls.name + "." + cls.methods.back().name;
}

std::string SyntheticProject::remove_method(GitRepo &repo) {
  auto &cls = pick_class();
  if (cls.methods.size() < 2) return add_method(repo);
  auto idx = rng_() % cls.methods.size();
  std::string name = cls.methods[idx].name;
  cls.methods.erase(cls.methods.begin() + static_cast<long>(idx));
  write(repo, cls);
  return "remove " + cls.name + "." + name;
}

std::string SyntheticProject::add_call(GitRepo &repo) {
  auto &cls = pick_class();
  if (cls.methods.empty()) return add_method(repo);
  auto &target_cls = pick_class();
  if (target_cls.methods.empty()) return add_method(repo);
  auto &m = cls.methods[rng_() % cls.methods.size()];
  const auto &callee = target_cls.methods[rng_() % target_cls.methods.size()];
  if (callee.name == m.name) return edit_body(repo);
  m.calls.emplace_back(target_cls.name, callee.name);
  write(repo, cls);
  return "call " + cls.name + "." + m.name + " -> " + target_cls.name + "." + callee.name;
}

std::string SyntheticProject::add_file(GitRepo &repo) {
  JavaClass cls;
  cls.name = "C" + std::to_string(next_class_++);
  cls.path = "src/demo/" + cls.name + ".java";
  for (int m = 0; m < 2; ++m) cls.methods.push_back(make_method("m" + std::to_string(next_method_++)));
  auto &target = pick_class();
  if (!target.methods.empty()) cls.methods[0].calls.emplace_back(target.name, target.methods[0].name);
  write(repo, cls);
  std::string name = cls.name;
  classes_[name] = std::move(cls);
  return "new file " + name;
}

std::string SyntheticProject::delete_file(GitRepo &repo) {
  if (classes_.size() < 3) return add_file(repo);
  auto &cls = pick_class();
  std::string name = cls.name;
  repo.remove(cls.path);
  classes_.erase(name);
  return "delete " + name;
}

std::string SyntheticProject::rename_file(GitRepo &repo) {
  auto &cls = pick_class();
  std::string to = cls.path.find("/moved/") == std::string::npos ? "src/moved/" + cls.name + ".java"
                                                                  : "src/demo/" + cls.name + ".java";
  repo.rename(cls.path, to);
  std::string from = cls.path;
  cls.path = to;
  return "rename " + from + " -> " + to;
}

std::string SyntheticProject::mutate(GitRepo &repo) {
  switch (rng_() % 8) {
    case 0:
    case 1:
      return edit_body(repo);
    case 2:
      return add_method(repo);
    case 3:
      return remove_method(repo);
    case 4:
      return add_call(repo);
    case 5:
      return add_file(repo);
    case 6:
      return delete_file(repo);
    default:
      return rename_file(repo);
  }
}

}  // namespace fixture
