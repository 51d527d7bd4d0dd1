# Core functionality package 