# Scene Grammar Parser Package
