# wherelog: where-to-log toolkit
