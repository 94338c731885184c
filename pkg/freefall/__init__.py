# freefall package init
