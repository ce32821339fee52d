#include "history.hpp"

namespace fixture {

namespace {

void tally(History &h, const std::string &what) {
  if (what.starts_with("new file")) ++h.adds;
  else if (what.starts_with("delete")) ++h.deletes;
  else if (what.starts_with("rename")) ++h.renames;
  else ++h.edits;
}

void step(GitRepo &repo, SyntheticProject &project, History &h, int i, const Author &author) {
  auto what = project.mutate(repo);
  tally(h, what);
  if (i % 3 == 0) tally(h, project.mutate(repo));
  h.commits.push_back(repo.commit(what, author));
}

}  // namespace

History build_history(GitRepo &repo, unsigned seed, int files, int methods) {
  History h;
  Author alice, bob{"Bob", "bob@example.com"}, carol{"Carol", "carol@example.com"};
  SyntheticProject main(seed);
  main.populate(files, methods);
  main.write_all(repo);
  h.commits.push_back(repo.commit("initial import", alice));

  // one of each file-level change up front, on main
  tally(h, main.add_file(repo));
  h.commits.push_back(repo.commit("add file", alice));
  tally(h, main.rename_file(repo));
  h.commits.push_back(repo.commit("rename file", alice));
  tally(h, main.delete_file(repo));
  h.commits.push_back(repo.commit("delete file", alice));
  for (int i = 0; i < 3; ++i) step(repo, main, h, i, alice);

  SyntheticProject feature = main;
  repo.branch("feature");
  ++h.forks;
  for (int i = 0; i < 6; ++i) step(repo, main, h, i, alice);

  SyntheticProject hotfix = main;
  repo.branch("hotfix");
  ++h.forks;
  for (int i = 0; i < 2; ++i) step(repo, main, h, i, alice);

  repo.checkout("feature");
  for (int i = 0; i < 4; ++i) step(repo, feature, h, i, bob);
  SyntheticProject nested = feature;
  repo.branch("nested");
  ++h.forks;
  for (int i = 0; i < 6; ++i) step(repo, feature, h, i, bob);

  repo.checkout("nested");
  for (int i = 0; i < 6; ++i) step(repo, nested, h, i, carol);

  repo.checkout("hotfix");
  for (int i = 0; i < 3; ++i) step(repo, hotfix, h, i, carol);

  repo.checkout("main");
  return h;
}

}  // namespace fixture
