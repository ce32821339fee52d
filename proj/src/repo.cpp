#include "cvalue/repo.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "process.hpp"

namespace cvalue::repo {

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added:
      return "added";
    case ChangeKind::Deleted:
      return "deleted";
    case ChangeKind::Modified:
      return "modified";
    case ChangeKind::Renamed:
      return "renamed";
  }
  return "modified";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool zero_id(const std::string &id) { return id.find_first_not_of('0') == std::string::npos; }

}  // namespace

DeveloperIdentity resolve_developer(const CommitRecord &commit, const BotPatterns &bots) {
  DeveloperIdentity dev;
  dev.email = lower(trim(commit.author_email));
  dev.display_name = trim(commit.author_name);
  if (dev.email.empty() && dev.display_name.empty()) throw MissingAuthor("commit " + commit.id + " has no author");
  std::string name = lower(dev.display_name);
  for (const auto &p : bots.patterns) {
    std::string pattern = lower(p);
    if (pattern.empty()) continue;
    if (dev.email.find(pattern) != std::string::npos || name.find(pattern) != std::string::npos) {
      dev.is_bot = true;
      break;
    }
  }
  return dev;
}

namespace {

std::map<std::string, std::vector<const CommitRecord *>> first_parent_children(const VersionTree &tree,
                                                                               std::vector<const CommitRecord *> &roots) {
  std::map<std::string, std::vector<const CommitRecord *>> children;
  for (const auto &[id, c] : tree.commits) {
    if (c.parent_ids.empty() || !tree.commits.contains(c.parent_ids.front())) {
      roots.push_back(&c);
    } else {
      children[c.parent_ids.front()].push_back(&c);
    }
  }
  auto order = [](const CommitRecord *a, const CommitRecord *b) {
    return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->id < b->id;
  };
  std::sort(roots.begin(), roots.end(), order);
  for (auto &[id, kids] : children) std::sort(kids.begin(), kids.end(), order);
  return children;
}

}  // namespace

std::vector<const CommitRecord *> walk_commits(const VersionTree &tree) {
  std::vector<const CommitRecord *> roots;
  auto children = first_parent_children(tree, roots);
  std::vector<const CommitRecord *> order;
  order.reserve(tree.commits.size());
  std::vector<const CommitRecord *> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const CommitRecord *c = stack.back();
    stack.pop_back();
    order.push_back(c);
    auto it = children.find(c->id);
    if (it == children.end()) continue;
    for (auto k = it->second.rbegin(); k != it->second.rend(); ++k) stack.push_back(*k);
  }
  return order;
}

std::size_t count_forks(const VersionTree &tree) {
  std::vector<const CommitRecord *> roots;
  auto children = first_parent_children(tree, roots);
  std::size_t forks = 0;
  for (const auto &[id, kids] : children) forks += kids.size() - 1;
  return forks;
}

bool is_binary(const std::string &content) { return content.find('\0') != std::string::npos; }

Repository::Repository(std::filesystem::path path) : path_(std::move(path)) {
  auto r = process::run({"git", "-C", path_.string(), "rev-parse", "--absolute-git-dir"});
  if (r.exit_code != 0 || !std::filesystem::exists(path_))
    throw NotARepository("not a git repository: " + path_.string());
  git_dir_ = trim(r.out);
}

Repository::~Repository() = default;

std::string Repository::git_output(const std::vector<std::string> &args) const {
  std::vector<std::string> argv{"git", "-C", path_.string(), "-c", "core.quotepath=off"};
  argv.insert(argv.end(), args.begin(), args.end());
  auto r = process::run(argv);
  if (r.exit_code != 0) throw CorruptHistory("git " + args.front() + " failed: " + trim(r.err));
  return r.out;
}

std::vector<std::string> Repository::git(std::initializer_list<std::string> args) const {
  std::vector<std::string> lines;
  for (auto &l : split(git_output(std::vector<std::string>(args)), '\n'))
    if (!l.empty()) lines.push_back(l);
  return lines;
}

VersionTree Repository::load(const std::optional<std::string> &branch) const {
  VersionTree tree;
  if (branch) {
    auto r = process::run({"git", "-C", path_.string(), "rev-parse", "--verify", "--quiet", *branch + "^{commit}"});
    if (r.exit_code != 0) throw RepositoryError("unknown branch: " + *branch);
    tree.heads.push_back(trim(r.out));
  } else {
    for (auto &line : git({"for-each-ref", "--format=%(objectname)", "refs/heads"})) tree.heads.push_back(line);
  }
  std::sort(tree.heads.begin(), tree.heads.end());
  tree.heads.erase(std::unique(tree.heads.begin(), tree.heads.end()), tree.heads.end());
  if (tree.heads.empty()) return tree;

  std::vector<std::string> args{"-c",         "log.showRoot=true",
                                "log",        "--format=%x01%H%x1f%P%x1f%an%x1f%ae%x1f%at",
                                "--raw",      "-M",
                                "-z",         "--no-abbrev",
                                "--no-ext-diff", "--diff-merges=first-parent"};
  args.insert(args.end(), tree.heads.begin(), tree.heads.end());
  args.push_back("--");
  std::string out = git_output(args);

  auto tokens = split(out, '\0');
  CommitRecord *current = nullptr;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string tok = tokens[i];
    while (!tok.empty() && tok.front() == '\n') tok.erase(0, 1);
    if (tok.empty()) continue;
    if (tok.front() == '\x01') {
      auto fields = split(tok.substr(1), '\x1f');
      if (fields.size() != 5) throw CorruptHistory("unexpected log record");
      CommitRecord c;
      c.id = trim(fields[0]);
      for (auto &p : split(trim(fields[1]), ' '))
        if (!p.empty()) c.parent_ids.push_back(p);
      c.author_name = fields[2];
      c.author_email = fields[3];
      c.timestamp = std::stoll(trim(fields[4]));
      auto [it, inserted] = tree.commits.emplace(c.id, std::move(c));
      current = &it->second;
      continue;
    }
    if (tok.front() != ':' || current == nullptr) throw CorruptHistory("unexpected log output");
    // ":<old mode> <new mode> <old id> <new id> <status>" then one or two paths
    auto meta = split(tok.substr(1), ' ');
    if (meta.size() < 5) throw CorruptHistory("malformed raw diff line");
    const std::string &old_mode = meta[0];
    const std::string &new_mode = meta[1];
    char status = meta[4].empty() ? 'M' : meta[4][0];
    FileEntry entry;
    entry.old_blob = zero_id(meta[2]) ? "" : meta[2];
    entry.new_blob = zero_id(meta[3]) ? "" : meta[3];
    if (i + 1 >= tokens.size()) throw CorruptHistory("truncated raw diff");
    entry.path = tokens[++i];
    entry.old_path = entry.path;
    if (status == 'R' || status == 'C') {
      if (i + 1 >= tokens.size()) throw CorruptHistory("truncated rename");
      entry.path = tokens[++i];
    }
    // gitlinks (submodules) carry no blob
    if (old_mode == "160000" || new_mode == "160000") continue;
    switch (status) {
      case 'A':
      case 'C':
        entry.kind = ChangeKind::Added;
        if (status == 'C') {
          entry.old_blob.clear();
          entry.old_path = entry.path;
        }
        break;
      case 'D':
        entry.kind = ChangeKind::Deleted;
        break;
      case 'R':
        entry.kind = ChangeKind::Renamed;
        break;
      default:
        entry.kind = ChangeKind::Modified;
        break;
    }
    current->changed_files.push_back(std::move(entry));
  }
  for (auto &[id, c] : tree.commits)
    for (const auto &p : c.parent_ids)
      if (!tree.commits.contains(p)) throw CorruptHistory("commit " + id + " has a missing parent " + p);
  return tree;
}

std::string Repository::blob(const std::string &id) const {
  std::lock_guard lock(blob_mutex_);
  if (!cat_file_)
    cat_file_ = std::make_unique<process::Pipe>(std::vector<std::string>{"git", "-C", path_.string(), "cat-file",
                                                                         "--batch"});
  cat_file_->write(id + "\n");
  std::string header = cat_file_->read_line();
  auto parts = split(header, ' ');
  if (parts.size() < 3 || parts[1] == "missing") throw MissingBlob("missing blob " + id);
  std::size_t size = std::stoull(parts[2]);
  std::string data = cat_file_->read_exact(size);
  cat_file_->read_exact(1);  // trailing newline
  return data;
}

std::vector<FileChange> Repository::changed_files(const CommitRecord &commit) const {
  std::vector<FileChange> out;
  for (const auto &entry : commit.changed_files) {
    FileChange change;
    change.path = entry.path;
    change.old_path = entry.old_path;
    change.kind = entry.kind;
    if (!entry.old_blob.empty() && entry.kind != ChangeKind::Added) change.before_content = blob(entry.old_blob);
    if (!entry.new_blob.empty() && entry.kind != ChangeKind::Deleted) change.after_content = blob(entry.new_blob);
    change.binary = (change.before_content && is_binary(*change.before_content)) ||
                    (change.after_content && is_binary(*change.after_content));
    out.push_back(std::move(change));
  }
  return out;
}

std::map<std::string, std::string> Repository::tree_of(const std::string &commit) const {
  std::map<std::string, std::string> files;
  std::string out = git_output({"ls-tree", "-r", "-z", "--full-tree", commit});
  for (const auto &rec : split(out, '\0')) {
    if (rec.empty()) continue;
    auto tab = rec.find('\t');
    if (tab == std::string::npos) continue;
    auto meta = split(rec.substr(0, tab), ' ');
    if (meta.size() < 3 || meta[1] != "blob") continue;
    files[rec.substr(tab + 1)] = meta[2];
  }
  return files;
}

std::string Repository::fingerprint() const {
  // FNV-1a over the absolute git directory
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : git_dir_.string()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

VersionTree open_repository(const std::filesystem::path &path, const std::optional<std::string> &branch) {
  return Repository(path).load(branch);
}

}  // namespace cvalue::repo
