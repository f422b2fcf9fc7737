"""Reference numbers next to the values this library computes."""

from interworld.report import reproduce_paper_table, text_summary

print(text_summary(reproduce_paper_table()))
