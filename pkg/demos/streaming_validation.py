"""Validating unordered documents as a stream, rejecting at the first hopeless event."""

# %% A bibliography schema: articles need title, year and authors; books take
# authors or editors, never both.
from udime import parse_schema, validate_stream
from udime.syntax import read_events

dblp = parse_schema("""
root: dblp
dblp -> article* || book*
article -> title || year || author+
book -> title || year || publisher? || (author+ | editor+)
""")

good = """
<dblp>
  <book><year/><title/><author/><publisher/></book>
  <article><author/><year/><title/></article>
</dblp>
"""
outcome, stats = validate_stream(dblp, good)
print(outcome, stats)

# %% Sibling order is irrelevant, and a second title fails at its own opening
# tag, long before the article closes.
bad = "<dblp><article><title/><title/></article></dblp>"
outcome, stats = validate_stream(dblp, bad)
print(outcome)
print("events read:", stats.events_consumed, "of", sum(1 for _ in read_events(bad)))

# %% Some failures are only visible at the closing tag.
for doc in [
    "<dblp><article><title/><year/></article></dblp>",
    "<dblp><book><title/><year/><author/><editor/></book></dblp>",
]:
    print(validate_stream(dblp, doc)[0])
