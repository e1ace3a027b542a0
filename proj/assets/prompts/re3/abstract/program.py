    def story(self):
        ## The story is set in the present day and takes place in the United States.
        ## Joan Westfall is a woman who has died in a car accident. She is a kind and sympathetic person who is eager to help the people she left behind.
        self.set_gender(self.Joan_Westfall, "female")
        ## Brent Westfall is Joan's husband. He is a kind and loving man who is struggling to cope with his wife's death.
        self.set_relation(self.Joan_Westfall, 'husband', self.Brent_Westfall)
        self.set_relation(self.Brent_Westfall, 'wife', self.Joan_Westfall)
        self.set_gender(self.Brent_Westfall, "male")
        ## Jason Westfall is Joan's son. He is a young boy who is struggling to understand his mother's death.
        self.set_relation(self.Joan_Westfall, 'son', self.Jason_Westfall)
        self.set_relation(self.Jason_Westfall, 'mother', self.Joan_Westfall)
        self.set_age(self.Jason_Westfall, "young")
        self.set_gender(self.Jason_Westfall, "male")
        ## Jason Westfall sits on the floor, looking at the empty box that used to hold his sister-in-law's belongings.
        self.set_relation(self.Jason_Westfall, 'sister_in_laws', self.Joan_Westfall)
        self.set_relation(self.Joan_Westfall, 'brother_in_laws', self.Jason_Westfall)
        ## His gaze is unfocused. his dark blue eyes brimming with tears.
        self.set_appearance(self.Jason_Westfall, "dark blue eyes")
        ## He cries for hours, eventually falling asleep from exhaustion.
        ## When he wakes up, he feels dazed and ill.
        ## Joan died in a car accident on a rainy day several weeks ago.
        ## Jason has been carrying on with life ever since as best he can manage, but he still doesn't really know how to cope with Joan's death.
